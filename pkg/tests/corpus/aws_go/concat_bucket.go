package main

import (
	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/s3"
)

func Handler(tenantID string, line string) error {
	svc := s3.New(session.Must(session.NewSession()))
	bucket := "tenant-" + tenantID
	_, err := svc.PutObject(&s3.PutObjectInput{
		Bucket: aws.String(bucket),
		Key:    aws.String("audit.log"),
	})
	return err
}
