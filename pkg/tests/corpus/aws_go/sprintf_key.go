package main

import (
	"fmt"
	"os"

	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/s3"
)

func Handler(userID string, avatar []byte) error {
	svc := s3.New(session.Must(session.NewSession()))
	key := fmt.Sprintf("users/%s/avatar.png", userID)
	_, err := svc.PutObject(&s3.PutObjectInput{
		Bucket: aws.String(os.Getenv("MEDIA_BUCKET")),
		Key:    aws.String(key),
	})
	return err
}
