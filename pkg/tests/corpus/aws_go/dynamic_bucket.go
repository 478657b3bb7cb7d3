package main

import (
	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/s3"
)

type Request struct {
	Bucket string
	Data   string
}

func Handler(req Request) error {
	svc := s3.New(session.Must(session.NewSession()))
	_, err := svc.PutObject(&s3.PutObjectInput{
		Bucket: aws.String(req.Bucket),
		Key:    aws.String("payload.json"),
	})
	return err
}
